"""Hulpfuncties: numerieke helpers en profiling."""
