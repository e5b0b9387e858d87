"""Experiment commands: one module per subcommand of the graph-hje CLI."""
