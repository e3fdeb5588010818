"""TASER solver: preconditioned forward-backward splitting on the triangular factor."""
