"""Scenario-driven command-line front end

Scenarios are JSON documents naming a generator, a time grid, a task and its
parameters; running one produces a JSON report with every witness needed to
check its claims, plus CSV time series for plotting.

"""

from . import scenario, report
from .scenario import Scenario, tasks
from .report import Report, execute, export_plot_data
from .main import main
