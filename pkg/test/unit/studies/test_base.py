# This code is part of qba-fem.
#
# (C) Copyright qba-fem developers 2026.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
#
# Any modifications or derivative works of this code must retain this
# copyright notice, and modified files need to carry a notice indicating
# that they have been altered from the originals.

"""Test BaseStagedStudy."""

import logging
from unittest.mock import Mock

from pandas import DataFrame
from pytest import approx, fixture, mark, raises

from qba_fem.studies import BaseStagedStudy, StudyResult


################################################################################
## FIXTURES
################################################################################
@fixture(scope="function")
def study():
    """BaseStagedStudy fixture object with quadratic errors."""
    namespace = {
        "COLUMNS": ("level", "h", "err"),
        "RATE_COLUMNS": ("err",),
        "_solve_single_level": Mock(side_effect=lambda mesh: mesh),
        "_measure_single_level": Mock(
            side_effect=lambda mesh, solution: {"level": mesh.level, "h": mesh.h, "err": mesh.h**2}
        ),
        "_build_single_row": Mock(side_effect=lambda report: report),
        "_check": Mock(return_value=[]),
    }
    cls = type("DummyStagedStudy", (BaseStagedStudy,), namespace)
    return cls()


################################################################################
## TESTS
################################################################################
class TestPipeline:
    """Test BaseStagedStudy pipeline."""

    @mark.parametrize("levels", [(1,), (1, 2), (2, 3, 4), [1, 3]])
    def test_run(self, study, levels):
        """Test run."""
        # Mock
        study._prepare = Mock()
        # Test
        result = study.run(levels)
        assert isinstance(result, StudyResult)
        assert isinstance(result.table, DataFrame)
        assert list(result.table.columns) == ["level", "h", "err"]
        assert result.table["level"].tolist() == list(levels)
        assert study._solve_single_level.call_count == len(levels)
        assert study._measure_single_level.call_count == len(levels)
        study._prepare.assert_called_once()
        (hierarchy,) = study._prepare.call_args.args
        assert len(hierarchy) == max(levels) + 1
        assert result.violations == ()
        assert result.summary == {}

    def test_rates(self, study):
        """Test that rates are fitted per rate column."""
        result = study.run((1, 2, 3))
        assert set(result.rates) == {"rate_err"}
        assert result.rates["rate_err"] == approx(2.0)

    def test_reference_gap(self, study):
        """Test that the hierarchy reaches beyond the finest level."""
        study.REFERENCE_GAP = 2
        study._prepare = Mock()
        study.run((1, 2))
        (hierarchy,) = study._prepare.call_args.args
        assert len(hierarchy) == 5

    def test_violations(self, study, caplog):
        """Test that violations are returned and logged."""
        study._check = Mock(return_value=["first: failed", "second: failed"])
        with caplog.at_level(logging.WARNING):
            result = study.run((1, 2))
        assert result.violations == ("first: failed", "second: failed")
        assert "first: failed" in caplog.text
        table, reports, rates = study._check.call_args.args
        assert table.equals(result.table)
        assert reports == result.reports
        assert rates == result.rates


class TestStages:
    """Test BaseStagedStudy stages."""

    @mark.parametrize("num_meshes", range(1, 5))
    def test_solve_levels(self, study, num_meshes):
        """Test solve_levels."""
        meshes = tuple(Mock() for _ in range(num_meshes))
        output = study._solve_levels(meshes)
        assert study._solve_single_level.call_count == num_meshes
        for mesh in meshes:
            study._solve_single_level.assert_any_call(mesh)
        assert output == meshes  # Note: thanks to side_effect

    @mark.parametrize("num_meshes", range(1, 5))
    def test_measure_levels(self, study, num_meshes):
        """Test measure_levels."""
        meshes = tuple(Mock(level=i, h=1 / (i + 1)) for i in range(num_meshes))
        solutions = tuple(Mock() for _ in range(num_meshes))
        output = study._measure_levels(meshes, solutions)
        assert study._measure_single_level.call_count == num_meshes
        for mesh, solution in zip(meshes, solutions):
            study._measure_single_level.assert_any_call(mesh, solution)
        assert [report["level"] for report in output] == list(range(num_meshes))

    def test_build_meshes(self, study):
        """Test build_meshes."""
        meshes = study._build_meshes((2, 3))
        assert [mesh.level for mesh in meshes] == [2, 3]


class TestValidation:
    """Test level validation."""

    @mark.parametrize("levels", ["123", 3, None, {1, 2}])
    def test_levels_type(self, study, levels):
        """Test that non-sequences raise."""
        with raises(TypeError):
            study.run(levels)

    @mark.parametrize("level", [0.5, "1", None, (1,), complex(1, 0)])
    def test_level_type(self, study, level):
        """Test that non-integer levels raise."""
        with raises(TypeError):
            study.run((level,))

    @mark.parametrize("levels", [(), (3, 2), (2, 2), (-1, 2), (1, 8)])
    def test_levels_value(self, study, levels):
        """Test empty, unordered and out-of-range levels."""
        with raises(ValueError):
            study.run(levels)
