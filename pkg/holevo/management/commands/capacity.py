"""
C-bar: the maximum of the Holevo quantity over priors.

Usage:
    python manage.py capacity channel.json
    python manage.py capacity channel.json --tol 1e-9
"""

from holevo.quantum.capacity import OptimizerOptions, maximize_holevo
from holevo.quantum.channel import holevo_quantity
from holevo.quantum.constants import MAX_ITERATIONS, OPTIMIZER_TOL

from ._base import HolevoCommand


class Command(HolevoCommand):
    help = "Maximize the Holevo quantity over input priors"

    def add_options(self, parser):
        parser.add_argument("--tol", type=float, default=OPTIMIZER_TOL, help="Optimality gap in bits (default: 1e-7)")
        parser.add_argument("--max-iter", type=int, default=MAX_ITERATIONS, help="Iteration budget")

    def compute(self, options):
        spec = self.load(options)
        result = maximize_holevo(spec.channel, OptimizerOptions(tol=options["tol"], max_iter=options["max_iter"]))
        outputs = {
            "c_bar": result.value,
            "optimizer_prior": result.optimizer_prior.probabilities,
            "iterations": result.iterations,
            "gradient_norm": result.gradient_norm,
            "optimality_gap": result.details.get("optimality_gap", 0.0),
            "converged": result.converged,
        }
        units = {
            "c_bar": "bits",
            "optimizer_prior": "probability",
            "iterations": "count",
            "gradient_norm": "dimensionless",
            "optimality_gap": "bits",
            "converged": "flag",
        }
        if spec.prior is not None:
            outputs["holevo_quantity_at_prior"] = holevo_quantity(spec.channel, spec.prior)
            units["holevo_quantity_at_prior"] = "bits"
        return self.record({"spec": options["spec"], "tol": options["tol"]}, outputs, units)
