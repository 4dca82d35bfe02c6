from stability.features import save_matrix
from stability.imaging import read_corpus
from stability.labels import StabilityLabel
from stability.management.base import StabilityCommand
from stability.pipeline import (
    GRANULARITIES, collect_windows, save_model, train_from_windows,
)


class Command(StabilityCommand):
    help = 'Обучает классификатор PCA + k-means на корпусе клипов.'

    def add_arguments(self, parser):
        parser.add_argument('corpus_dir', help='Каталог корпуса клипов.')
        parser.add_argument('--seed', type=int, required=True)
        parser.add_argument('--out', required=True, help='Файл модели.')
        self.add_flsc_arguments(parser)
        parser.add_argument('--window-len', type=int, default=None)
        parser.add_argument('--stride', type=int, default=None)
        parser.add_argument('--components', type=int, default=None)
        parser.add_argument('--clusters', type=int, default=None)
        parser.add_argument('--restarts', type=int, default=None)
        parser.add_argument(
            '--label-granularity', choices=GRANULARITIES, default=None)
        parser.add_argument(
            '--dump-features', default=None,
            help='Сохранить матрицу окон в файл FSPX.')

    def run(self, corpus_dir, **options):
        config = self.flsc_config(options)
        window_len = self.setting(
            options, 'window_len', 'FEATURE_WINDOW_LEN')
        granularity = self.setting(
            options, 'label_granularity', 'LABEL_GRANULARITY')
        matrix, labels = collect_windows(
            read_corpus(corpus_dir), config, window_len,
            self.setting(options, 'stride', 'FEATURE_WINDOW_STRIDE'),
            granularity,
        )
        if options['dump_features']:
            save_matrix(matrix, options['dump_features'])
        model = train_from_windows(
            matrix, labels, config.box, window_len, options['seed'],
            n_components=self.setting(
                options, 'components', 'PCA_COMPONENTS'),
            k=self.setting(options, 'clusters', 'KMEANS_CLUSTERS'),
            restarts=self.setting(options, 'restarts', 'KMEANS_RESTARTS'),
            max_iter=self.setting(options, 'max_iter', 'KMEANS_MAX_ITER'),
            tol=self.setting(options, 'tol', 'KMEANS_TOL'),
            granularity=granularity,
        )
        save_model(model, options['out'])
        self.write_summary(matrix.rows, model)

    def write_summary(self, windows, model):
        ratios = ', '.join(
            f'{ratio:.4f}' for ratio in model.pca.explained_variance_ratio)
        self.stderr.write(f'окон: {windows}')
        self.stderr.write(f'доли дисперсии: {ratios}')
        self.stderr.write(f'инерция: {model.kmeans.inertia:.6g}')
        for cluster, counts in enumerate(model.training_summary.tolist()):
            marker = ' *' if cluster == model.unstable_cluster else ''
            described = ', '.join(
                f'{label.slug}={counts[label]}' for label in StabilityLabel)
            self.stderr.write(f'кластер {cluster}: {described}{marker}')
        if model.low_confidence:
            self.stderr.write(
                'все окна получили одну метку FLSC: нестабильный кластер '
                'выбран с низкой уверенностью')
