"""Packet-level MANET simulator for comparing clustered backbones.

Two architectures are modeled: separate cluster heads and gateways (CH_G)
and a merged cluster-head-gateway role (CHG). Flooding of route requests
can be restricted to the backbone each architecture forms.
"""
from .harness import compare, sweep
from .network import Network, RunReport
from .scenario import ScenarioConfig, ScenarioError, bundled_scenario, load_scenario, parse_scenario
from .traffic import CbrFlow

__version__ = "0.1.0"

def run(config, **kw):
    """Simulate ``config`` to its sim_time and return the RunReport."""
    return Network(config, **kw).run()


__all__ = ["CbrFlow", "Network", "RunReport", "ScenarioConfig", "ScenarioError",
           "bundled_scenario", "compare", "load_scenario", "parse_scenario", "run", "sweep"]
