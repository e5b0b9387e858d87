"""Index bookkeeping helpers for the solver."""
