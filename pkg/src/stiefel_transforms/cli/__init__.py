"""CLI commands for stiefel_transforms."""
