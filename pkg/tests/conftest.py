import pytest

from fracbeam import BeamConfig, build_modal_model


@pytest.fixture(scope="session")
def case_no_tip_mass():
    return build_modal_model(BeamConfig.no_tip_mass())


@pytest.fixture(scope="session")
def case_tip_mass():
    return build_modal_model(BeamConfig.with_tip_mass())
