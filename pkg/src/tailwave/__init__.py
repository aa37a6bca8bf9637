"""Tail behaviour of two-dimensional linear wave equations in null coordinates.

The equation phi_uv + U phi_u + V phi_v + W phi = 0 is classified (CPP test,
substitution sequences), its Riemann function and exact progressing waves are
built, and tails are measured numerically for compactly supported data.
"""

__version__ = "0.1.0"

from .equation import (CppVerdict, FactorTransform, NormalForm, WaveEquation, classify_cpp,
                       factor_transforms, hp_verdict, normal_form, potential)
from .errors import *  # noqa: F401,F403
from .expr import EvalPoint, Expr, Rect, diff, evaluate, is_zero, parse, to_string
from .grid import Grid, TimeGrid
from .kundt_newman import (ProgressingWave, Status, SubstitutionSequence, build_pw0,
                           build_sequence, exact_solution, verify_amplitude_equations)
from .registry import RegistryEntry, multipole_l1_delta_solution
from .riemann import RiemannField, riemann_closed_form_cpp, riemann_numeric, verify_adjoint
from .solver import (CauchyData, CharacteristicData, Field, convergence_order, solve,
                     solve_cauchy, solve_goursat)
from .tails import TailRegion, TailReport, Verdict, measure_cauchy_tail, measure_goursat_tail
from .waveforms import Bump, PolynomialWave, TableWave
