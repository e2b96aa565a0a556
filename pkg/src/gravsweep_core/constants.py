"""Physical constants, CGS units.

All internal computation is done in centimeters, grams, seconds; the
presentation layers convert to Gyr and Mpc at the edges.
"""

# CODATA values, cgs
C_CGS = 2.99792458e10       # speed of light [cm s^-1]
G_CGS = 6.674e-8            # gravitational constant [cm^3 g^-1 s^-2]

MSUN_G = 1.989e33           # solar mass [g]
MPC_CM = 3.086e24           # megaparsec [cm]
GYR_S = 3.15576e16          # gigayear (Julian) [s]
