"""Monte-Carlo experiment engine: trial generation, sweeps, statistics and output."""
