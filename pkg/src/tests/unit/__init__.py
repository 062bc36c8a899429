"""Unit тесты для SOP LLM Executor."""
