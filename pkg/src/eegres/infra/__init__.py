"""Infrastructure modules."""

from eegres.infra.bundle_store import load_bundle, save_bundle
from eegres.infra.linalg import jacobi_eigh
from eegres.infra.scheduler import TaskScheduler

__all__ = ["TaskScheduler", "jacobi_eigh", "load_bundle", "save_bundle"]
