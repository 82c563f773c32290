"""Shared fixtures.

Profile reconstruction is the expensive step (the shot creeps along the
slow manifold before taking off), so profiles used by several test modules
are built once per session here.
"""
import pytest

import kppwaves as kw


def build_profile(m, p, q, c, arrival_radius=None):
    cm = kw.CanonicalModel(m=m, p=p, q=q)
    sys = kw.build_system(cm, abs(c))
    kwargs = {} if arrival_radius is None else {"arrival_radius": arrival_radius}
    traj = kw.shoot_from(sys, kw.Point.P2, kw.Direction.BACKWARD, **kwargs)
    return kw.reconstruct_profile(traj, sys, cm), cm


@pytest.fixture(scope="session")
def monotone_profile_121():
    """(m,p,q) = (1,2,1) at c = -3: a Case II monotone front."""
    return build_profile(1, 2, 1, -3.0)


@pytest.fixture(scope="session")
def oscillatory_profile_221():
    """(m,p,q) = (2,2,1) at c = -1: a Case I oscillatory front."""
    return build_profile(2, 2, 1, -1.0)


@pytest.fixture(scope="session")
def tight_profile_121():
    """Same front as monotone_profile_121, shot to within 1e-9 of the rest
    state.  The plateau behind the front is unstable under the reaction, so
    grid-convergence measurements need the tail this close to 1."""
    return build_profile(1, 2, 1, -3.0, arrival_radius=1e-9)


@pytest.fixture(scope="session")
def tight_profile_221():
    return build_profile(2, 2, 1, -1.0, arrival_radius=1e-9)


@pytest.fixture(scope="session")
def finite_prop_profile():
    """(m,p,q) = (1,1,0.5) at c = -3: compactly supported ahead of the front."""
    return build_profile(1, 1, 0.5, -3.0)
