int main() { float f; }
