"""Command line tooling: configuration, presets, runners and checks."""
