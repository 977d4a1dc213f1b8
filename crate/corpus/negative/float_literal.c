int main() { int x = 1.5; }
