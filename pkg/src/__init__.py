# Laboratorio de campos neuronales NestNet
