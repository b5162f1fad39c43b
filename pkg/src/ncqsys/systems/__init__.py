"""Evolution engines for the concrete discrete integrable systems."""
