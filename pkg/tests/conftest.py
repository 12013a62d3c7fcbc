import pytest

from instances import ResidualAudit
from pescuc import optkernel

RESIDUAL_TOL = 1e-6


@pytest.fixture(scope="session", autouse=True)
def residual_audit():
    """Check optimality residuals of every LP solved anywhere in the suite."""
    audit = ResidualAudit()
    optkernel.SOLVE_HOOKS.append(audit)
    yield audit
    optkernel.SOLVE_HOOKS.remove(audit)
    assert audit.max <= RESIDUAL_TOL, (
        f"LP residuals {audit.worst.tolist()} exceed {RESIDUAL_TOL} over {audit.count} solves")
