"""Data ingestion, synthetic generators, experiments and the command line."""
