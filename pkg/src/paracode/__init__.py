"""paracode: paragraph-level populist-content coding.

Pipeline stages: ingest raw documents into a paragraph corpus, embed
paragraphs through a pluggable vector provider, train five binary
classifiers per label dimension, combine their votes with a count
threshold, evaluate against gold labels, and hand flagged paragraphs to
human reviewers through a small HTTP service.
"""

__version__ = "0.1.0"
