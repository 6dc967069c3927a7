"""Peter-Weyl harmonic analysis on Spin(7)/G2."""
