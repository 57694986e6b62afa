"""Kernmodules: configuratie, logging, protocollen en domeinexcepties."""
