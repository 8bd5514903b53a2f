"""
Capacity under an additive cost budget sum_i pi_i f_i <= E.

The per-letter costs come from the "costs" entry of the channel spec.

Usage:
    python manage.py constrained channel.json --budget 0.3
"""

from holevo.quantum.capacity import CostConstraint, constrained_capacity
from holevo.quantum.errors import SpecParseError

from ._base import HolevoCommand


class Command(HolevoCommand):
    help = "Maximize the Holevo quantity over priors meeting a cost budget"

    def add_options(self, parser):
        parser.add_argument("--budget", type=float, required=True, help="Budget E on the mean letter cost")

    def compute(self, options):
        spec = self.load(options)
        if spec.costs is None:
            msg = f"{options['spec']} has no 'costs' entry"
            raise SpecParseError(msg)
        constraint = CostConstraint(spec.costs, options["budget"])
        result = constrained_capacity(spec.channel, constraint)
        outputs = {
            "constrained_capacity": result.value,
            "optimizer_prior": result.optimizer_prior.probabilities,
            "mean_cost": constraint.mean_cost(result.optimizer_prior),
            "multiplier": result.details["multiplier"],
            "constraint_active": result.details["active"],
            "converged": result.converged,
        }
        units = {
            "constrained_capacity": "bits",
            "optimizer_prior": "probability",
            "mean_cost": "dimensionless",
            "multiplier": "dimensionless",
            "constraint_active": "flag",
            "converged": "flag",
        }
        return self.record({"spec": options["spec"], "budget": options["budget"]}, outputs, units)
