"""Golden-mean renormalization toolkit."""
