"""
C-tilde = -log2 min over priors of Tr S-bar^2.

Usage:
    python manage.py ctilde channel.json
"""

from holevo.quantum.capacity import c_tilde

from ._base import HolevoCommand


class Command(HolevoCommand):
    help = "Evaluate the quadratic capacity bound C-tilde"

    def compute(self, options):
        spec = self.load(options)
        result = c_tilde(spec.channel)
        outputs = {
            "c_tilde": result.value,
            "min_purity": result.details["min_purity"],
            "optimizer_prior": result.optimizer_prior.probabilities,
            "iterations": result.iterations,
            "converged": result.converged,
        }
        units = {
            "c_tilde": "bits",
            "min_purity": "dimensionless",
            "optimizer_prior": "probability",
            "iterations": "count",
            "converged": "flag",
        }
        return self.record({"spec": options["spec"]}, outputs, units)
