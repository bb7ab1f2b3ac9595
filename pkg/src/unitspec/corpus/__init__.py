"""Hand-built diagrams shipped with expected hocolim homology."""
