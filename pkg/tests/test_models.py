import pytest
from django.db import IntegrityError

from conftest import N_PER_FIXTURE
from stability.evaluation import EvaluationReport, aggregate_raters
from stability.labels import StabilityLabel
from stability.models import EvaluationRecord, ExpertRating


@pytest.mark.django_db
def test_ratings_feed_aggregation(expert_ratings):
    rows = [rating.as_row() for rating in ExpertRating.objects.all()]
    assert len(rows) == N_PER_FIXTURE
    assert all(row.video_id == "video_a" and row.score == 2 for row in rows)
    verdict = aggregate_raters(rows)["video_a"]
    assert verdict.label == StabilityLabel.STABLE


@pytest.mark.django_db
def test_rater_scores_video_once(expert_ratings, mixer):
    rater_id = expert_ratings[0].rater_id
    with pytest.raises(IntegrityError):
        mixer.blend(
            ExpertRating, video_id="video_a", rater_id=rater_id, score=0)


@pytest.mark.django_db
def test_rating_str(mixer):
    rating = mixer.blend(
        ExpertRating, video_id="v", rater_id="r", score=StabilityLabel.STABLE)
    assert str(rating) == "v / r: 2"
    assert rating.get_score_display() == "стабильно"


@pytest.mark.django_db
def test_evaluation_record_keeps_report():
    report = EvaluationReport(tp=12, fp=3, tn=35, fn=3)
    EvaluationRecord.from_report("flsc", report).save()
    record = EvaluationRecord.objects.get(method="flsc")
    assert record.as_report() == report
    assert record.n == 53
    assert record.accuracy == pytest.approx(47 / 53)
    assert str(record) == "flsc: 47 из 53"


@pytest.mark.django_db
def test_evaluation_record_with_undefined_rates():
    record = EvaluationRecord.from_report(
        "empty", EvaluationReport(tp=0, fp=0, tn=0, fn=0))
    record.save()
    record.refresh_from_db()
    assert record.accuracy is None
    assert record.fn_rate is None
