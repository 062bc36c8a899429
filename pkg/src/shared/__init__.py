"""Общие компоненты приложения.

Этот пакет содержит переиспользуемые компоненты, используемые
в различных частях приложения.
"""
