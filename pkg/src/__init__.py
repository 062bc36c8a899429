"""ResNet ASR Lab - Main Package.

Детерминированная лаборатория transfer learning для ResNet классификатора
изолированных цифр в чистых и зашумлённых условиях.
"""

__version__ = "1.0.0"
__author__ = "ResNet ASR Lab Team"
