from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='EvaluationRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('method', models.CharField(max_length=64, verbose_name='Метод')),
                ('created_at', models.DateTimeField(auto_now_add=True, verbose_name='Добавлено')),
                ('n', models.PositiveIntegerField(verbose_name='Видео')),
                ('tp', models.PositiveIntegerField()),
                ('fp', models.PositiveIntegerField()),
                ('tn', models.PositiveIntegerField()),
                ('fn', models.PositiveIntegerField()),
                ('accuracy', models.FloatField(blank=True, null=True, verbose_name='Точность')),
                ('fp_rate', models.FloatField(blank=True, null=True, verbose_name='Доля ложных тревог')),
                ('fn_rate', models.FloatField(blank=True, null=True, verbose_name='Доля пропусков')),
            ],
            options={
                'verbose_name': 'результат оценки',
                'verbose_name_plural': 'Результаты оценки',
                'ordering': ('-created_at',),
            },
        ),
        migrations.CreateModel(
            name='ExpertRating',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('video_id', models.CharField(max_length=128, verbose_name='Видео')),
                ('rater_id', models.CharField(max_length=128, verbose_name='Эксперт')),
                ('score', models.PositiveSmallIntegerField(choices=[(0, 'нестабильно'), (1, 'не уверен'), (2, 'стабильно')], verbose_name='Оценка')),
                ('created_at', models.DateTimeField(auto_now_add=True, verbose_name='Добавлено')),
            ],
            options={
                'verbose_name': 'экспертная оценка',
                'verbose_name_plural': 'Экспертные оценки',
                'ordering': ('video_id', 'rater_id'),
                'unique_together': {('video_id', 'rater_id')},
            },
        ),
    ]
