"""Upper bounds on long-time and ensemble averages of polynomial dynamical systems.

The toolkit pairs two computations that sandwich the same quantity:

* direct simulation of trajectories and their tail averages, and
* a cutting-plane minimization over polynomial auxiliary functions whose
  drift is added to the observable, solved as a linear program whose dual
  is an atomic measure certifying the bound.
"""

from ergobound.polyalg import Polynomial, PolynomialVector, grad

__all__ = ["Polynomial", "PolynomialVector", "grad"]
__version__ = "0.1.0"
