"""Toolkit for finding k-th powers of Hamiltonian cycles in dense graphs.

The library implements, as executable algorithms, the absorption-method
construction that produces the k-th power of a Hamiltonian cycle in graphs
that are uniformly dense and hard to separate: exact and heuristic property
checkers, walk-count machinery, tight-path covers of clique hypergraphs,
end-to-end connection search, absorber sampling and assembly, and a staged
pipeline that emits verified certificates.  Small brute-force oracles back
every nontrivial component.
"""

from powerham.graph import Graph

__version__ = "0.1.0"

__all__ = ["Graph", "__version__"]
