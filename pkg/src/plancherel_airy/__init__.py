"""Plancherel decay chains on partitions and their Airy_2 edge limit.

Subpackages cover: exact partition combinatorics (``partitions``), the decay
chain and edge-trajectory samplers (``dynamics``), exact symmetric-group
algebra traces (``group_algebra``), the Chebyshev-type polynomial layer
(``chebyshev``), path/diagram combinatorics (``paths_diagrams``), the
limiting diagram-polytope functionals (``airy_limit``), and a reproducible
CLI (``cli``).
"""

__version__ = "0.1.0"
