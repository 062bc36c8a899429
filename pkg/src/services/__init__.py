"""Сервисы ResNet ASR Lab: аудио, корпус, обучение, оценка, конфигурация запусков."""
