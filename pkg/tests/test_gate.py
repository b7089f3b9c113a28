import numpy as np
import pytest

from signdict.gate import (
    BYTE_COMPLETE,
    BYTE_TRUNCATED,
    BYTE_UNDECODABLE,
    GateThresholds,
    SEVERITY_ERROR,
    SEVERITY_WARNING,
    VERDICT_PROCEED,
    VERDICT_PROCEED_WITH_WARNINGS,
    VERDICT_REJECT,
    check_technical,
    check_visibility,
    gate,
    make_issue,
)
from signdict.pose import LANDMARKS_PER_PERSON, PoseSequence


def person(visibility=0.95, center_x=0.5, frames=6):
    data = np.full((frames, LANDMARKS_PER_PERSON, 3), 0.5)
    data[:, :, 0] = center_x
    data[:, :, 2] = visibility
    return PoseSequence(data, 30.0, (640, 480))


class TestTechnical:
    def test_complete_good_resolution_passes(self):
        assert check_technical(BYTE_COMPLETE, (640, 480)) == []

    def test_truncated_rejects(self):
        issues = check_technical(BYTE_TRUNCATED, (640, 480))
        assert [i.code for i in issues] == ["incomplete_upload"]
        assert issues[0].severity == SEVERITY_ERROR

    def test_undecodable_rejects(self):
        issues = check_technical(BYTE_UNDECODABLE, None)
        assert [i.code for i in issues] == ["undecodable"]

    def test_low_resolution_warns(self):
        issues = check_technical(BYTE_COMPLETE, (160, 120))
        assert [i.code for i in issues] == ["low_resolution"]
        assert issues[0].severity == SEVERITY_WARNING

    def test_boundary_resolution_passes(self):
        assert check_technical(BYTE_COMPLETE, (192, 144)) == []

    def test_unknown_resolution_passes_technical(self):
        assert check_technical(BYTE_COMPLETE, None) == []

    def test_unknown_status_is_an_error(self):
        with pytest.raises(ValueError):
            check_technical("weird", (640, 480))


class TestVisibility:
    def test_clean_person_has_no_issues(self):
        assert check_visibility([person()]) == []

    def test_no_people_is_an_error(self):
        with pytest.raises(ValueError):
            check_visibility([])

    def test_two_people_short_circuits(self):
        issues = check_visibility([person(), person(visibility=0.1)])
        assert [i.code for i in issues] == ["multiple_people"]

    def test_off_center_warns(self):
        issues = check_visibility([person(center_x=0.8)])
        assert "off_center" in [i.code for i in issues]

    def test_center_band_edges(self):
        assert check_visibility([person(center_x=0.625)]) == []
        codes = [i.code for i in check_visibility([person(center_x=0.67)])]
        assert codes == ["off_center"]

    def test_hidden_hands_warn(self):
        p = person()
        p.data[:, 33:75, 2] = 0.2
        assert [i.code for i in check_visibility([p])] == ["hands_not_visible"]

    def test_hidden_torso_warns(self):
        p = person()
        p.data[:, (11, 12, 23, 24), 2] = 0.1
        assert [i.code for i in check_visibility([p])] == ["torso_not_visible"]

    def test_hidden_face_warns(self):
        p = person()
        p.data[:, 0:11, 2] = 0.1
        assert [i.code for i in check_visibility([p])] == ["face_not_visible"]

    def test_fraction_rule_tolerates_brief_dropouts(self):
        # hands hidden in 30% of frames: above the 0.6 visible floor
        p = person(frames=10)
        p.data[:3, 33:75, 2] = 0.1
        assert check_visibility([p]) == []

    def test_custom_thresholds(self):
        strict = GateThresholds(min_visible_fraction=0.95)
        p = person(frames=10)
        p.data[:1, 33:75, 2] = 0.1
        codes = [i.code for i in check_visibility([p], strict)]
        assert "hands_not_visible" in codes


class TestVerdict:
    def test_clean_proceeds(self):
        rep = gate([], [])
        assert rep.verdict == VERDICT_PROCEED
        assert rep.summary == "Submission looks good."

    def test_any_error_rejects(self):
        rep = gate([make_issue("incomplete_upload")], [make_issue("off_center")])
        assert rep.verdict == VERDICT_REJECT
        assert rep.summary.startswith("Submission rejected:")

    def test_warnings_only_proceeds_with_warnings(self):
        rep = gate([make_issue("low_resolution")], [make_issue("off_center")])
        assert rep.verdict == VERDICT_PROCEED_WITH_WARNINGS
        assert "2 warnings" in rep.summary

    def test_suggestions_deduplicated(self):
        rep = gate([make_issue("low_resolution"), make_issue("low_resolution")], [])
        assert len(rep.suggestions) == 1

    def test_to_dict_shape(self):
        rep = gate([make_issue("low_resolution")], [])
        doc = rep.to_dict()
        assert set(doc) == {"verdict", "summary", "issues", "suggestions"}
        assert doc["issues"][0]["code"] == "low_resolution"
        assert doc["issues"][0]["suggestion"]


class TestThresholds:
    def test_rejects_fraction_out_of_range(self):
        with pytest.raises(ValueError):
            GateThresholds(center_band=1.5)

    def test_rejects_nonpositive_resolution(self):
        with pytest.raises(ValueError):
            GateThresholds(min_width=0)


class TestFixtures:
    """End-to-end gate behavior on the committed pose files."""

    @pytest.mark.parametrize(
        "name,verdict,codes",
        [
            ("clean_640x480", VERDICT_PROCEED, []),
            ("two_people", VERDICT_PROCEED_WITH_WARNINGS, ["multiple_people"]),
            ("hands_hidden", VERDICT_PROCEED_WITH_WARNINGS, ["hands_not_visible"]),
            ("low_res_160x120", VERDICT_PROCEED_WITH_WARNINGS, ["low_resolution"]),
            ("truncated", VERDICT_REJECT, ["incomplete_upload"]),
        ],
    )
    def test_fixture_verdicts(self, fixtures_dir, name, verdict, codes):
        from signdict.estimate import FilePoseEstimator

        est = FilePoseEstimator()
        media = (fixtures_dir / f"{name}.pose").read_bytes()
        probe = est.probe(media)
        technical = check_technical(probe.byte_status, probe.resolution)
        visibility = []
        if not any(i.severity == SEVERITY_ERROR for i in technical):
            visibility = check_visibility(est.tracks(media))
        rep = gate(technical, visibility)
        assert rep.verdict == verdict
        assert [i.code for i in rep.issues] == codes
