"""Passenger-flow forecasting toolkit: ingest, classify, featurize, model, study."""

__version__ = "0.1.0"
