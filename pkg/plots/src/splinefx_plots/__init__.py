from .figures import (plot_bitwidth_sweep, plot_capacity_sweep, plot_decision_boundary,
                      plot_regret, plot_running_accuracy, read_step_csv, read_summary_csv)

__version__ = "0.1.0"
