int main() { int x = sizeof(int); }
