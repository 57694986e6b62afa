"""Applicatielaag: command-line entrypoint en versie-informatie."""
