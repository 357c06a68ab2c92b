"""Exact Mackey-functor homological algebra for cyclic p-groups.

Two independent engines: derived Ext/Tor over the constant Mackey functor
Z via permutation-functor resolutions, and RO(G)-graded Bredon homology of
representation spheres; they cross-validate against each other and against
the published closed-form tables.
"""

from .intlin import FgAbGroup, GroupHom, SmithForm, smith_normal_form, solve_integer
from .mackey import (
    MackeyFunctor,
    MackeyHom,
    TowerShape,
    bform,
    catalog,
    constant_z,
    dual_levelwise,
    fingerprint,
    form_z,
    is_cohomological,
    is_isomorphic,
    pullback_psi,
    render_lewis,
    z_star,
    zero_functor,
)
from .burnside import GSet, SpanWord, eval_module, fixed_point_functor, lift, perm_functor
from .boxhom import box, hom_group, internal_hom
from .homalg import GradedMackey, ext_z, resolve, tor_z
from .spheres import (
    RepLabel,
    anderson_check,
    bredon_homology,
    ext_sphere_crosscheck,
    form_to_rep,
    parse_label,
    sphere_chain,
)

__version__ = "1.0.0"
