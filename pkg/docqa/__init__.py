# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
"""Question answering over parsed research papers.

Documents are ingested into a relational store, selected columns are encoded into
vector collections, and an agent answers questions by alternating SQL queries,
filtered similarity searches, image crops and arithmetic until it commits to an
answer.
"""
