"""Fractional repetition codes: constructions, composition, analysis, simulation."""
from .analysis import (bounds, check_union_condition, delta, dmin_exact, file_size,
                       file_size_bruteforce, find_cap_and_arc, greedy_distance_accumulate,
                       local_fr_bound, local_bound, local_structure, local_structure_of,
                       mincor_bound, net_file_size_greedy, profile, singleton_bound)
from .catalog import catalog_load, catalog_names
from .compose import (beta_expand, disjoint_union, find_resolution, identity_code,
                      is_trivially_expandable, kronecker, select_classes)
from .core import (CodeParams, FRCode, RepairTable, bipartite_export, check_beta_recoverable,
                   find_repair_table, incidence_matrix, repair_parameters, resilience, transpose,
                   validate)
from .designs import (affine_resolvable, complement_identity, grid, hadamard, mols_net,
                      projective_plane, steiner_triple)
from .errors import FRError
from .families import construct, load_code
from .fields import FiniteField, gf
from .graphs import girth_code, graph_by_name
from .sim import OuterCode, collect, encode_store, fail_and_repair, run_scenario
