from dataclasses import dataclass

#: CODATA 2018 Newtonian constant of gravitation [m^3 kg^-1 s^-2]
G_CODATA = 6.67430e-11
#: speed of light in vacuum [m/s], exact by definition of the metre
C_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class PhysicalConstants:
    """Gravitational constant and speed of light.

    Override either one for nondimensionalised work, e.g.
    ``PhysicalConstants(G=1.0, c=1.0)``.
    """

    G: float = G_CODATA
    c: float = C_LIGHT

    def __post_init__(self):
        if not (self.G > 0 and self.c > 0):
            raise ValueError(f"G and c must be positive, got G={self.G}, c={self.c}")


SI = PhysicalConstants()
