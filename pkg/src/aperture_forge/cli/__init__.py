"""Command-line front end: config ingestion, scenario runs, artifacts."""
