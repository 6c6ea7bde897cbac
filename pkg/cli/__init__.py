"""Command-line front ends for geoprop."""
