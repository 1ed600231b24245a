"""belltool: values, bounds and certificates for linear nonlocal games
over finite Abelian groups, their graphs, and tripartite entanglement
witnesses."""

__version__ = "1.0.0"
