"""Reports and command handlers."""

from eegres.services.reports import export_report, load_result

__all__ = ["export_report", "load_result"]
