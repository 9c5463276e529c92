"""Finite-level computations around lattices in Neretin's group.

Modules:

* :mod:`neretin.perm` permutations and permutation groups (Schreier-Sims);
* :mod:`neretin.tree` the regular tree around a fixed edge, spheres, balls;
* :mod:`neretin.almost` tree-pair almost automorphisms and the filtration;
* :mod:`neretin.bounds` entropy, multinomial and Babai-type arithmetic;
* :mod:`neretin.small_index` large alternating subgroups of small-index groups;
* :mod:`neretin.verifier` level covolumes and obstruction certificates;
* :mod:`neretin.cli` the ``neretin`` command.
"""

__version__ = "0.1.0"
