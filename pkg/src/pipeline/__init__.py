from .runner import print_sweep, run_bound_sweep

__all__ = ["print_sweep", "run_bound_sweep"]
