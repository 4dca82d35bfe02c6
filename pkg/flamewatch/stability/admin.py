from django.contrib import admin

from .models import EvaluationRecord, ExpertRating


@admin.register(ExpertRating)
class ExpertRatingAdmin(admin.ModelAdmin):
    list_display = ('video_id', 'rater_id', 'score', 'created_at')
    list_filter = ('score',)
    search_fields = ('video_id', 'rater_id')


@admin.register(EvaluationRecord)
class EvaluationRecordAdmin(admin.ModelAdmin):
    list_display = (
        'method', 'created_at', 'n', 'accuracy', 'fp_rate', 'fn_rate')
    list_filter = ('method',)
