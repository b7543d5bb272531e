"""neuro-drift: 駆動型/受動型の神経複雑性トレンド比較ツール"""

__version__ = "0.1.0"

# アーティファクト形式のバージョン（ヘッダに埋め込む）
ARTIFACT_FORMAT_VERSION = 1
