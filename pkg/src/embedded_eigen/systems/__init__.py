"""Rekenende systemen: bandstructuur, Prüfer-variabelen, constructie en verificatie."""
