"""Problem construction: constellations, observations and real-valued T matrices."""
