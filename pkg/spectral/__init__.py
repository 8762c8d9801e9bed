"""
Spectral side of the project: scattering matrices, the secular polynomial,
the spectrum solver and trace vectors. Submodules are imported by name.
"""
