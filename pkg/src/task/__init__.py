"""Contains decomposition, thresholding, period analysis and synthetic data."""
